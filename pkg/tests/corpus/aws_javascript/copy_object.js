const AWS = require('aws-sdk');

const s3 = new AWS.S3();

exports.handler = async (event) => {
  await s3.copyObject({
    Bucket: process.env.DEST_BUCKET,
    Key: 'latest/data.json',
    CopySource: 'staging/data.json',
  }).promise();
  return { copied: true };
};
