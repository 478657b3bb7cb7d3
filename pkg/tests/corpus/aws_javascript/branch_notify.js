const AWS = require('aws-sdk');

const sns = new AWS.SNS();
const sqs = new AWS.SQS();

exports.handler = async (event) => {
  if (event.urgent) {
    await sns.publish({ TopicArn: process.env.PAGER_TOPIC, Message: event.text }).promise();
  } else {
    await sqs.sendMessage({ QueueUrl: process.env.BACKLOG_QUEUE, MessageBody: event.text }).promise();
  }
  return { routed: true };
};
