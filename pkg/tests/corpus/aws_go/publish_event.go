package main

import (
	"os"

	"github.com/aws/aws-sdk-go/aws"
	"github.com/aws/aws-sdk-go/aws/session"
	"github.com/aws/aws-sdk-go/service/sns"
)

func Handler(message string) error {
	svc := sns.New(session.Must(session.NewSession()))
	_, err := svc.Publish(&sns.PublishInput{
		TopicArn: aws.String(os.Getenv("EVENT_TOPIC")),
		Message:  aws.String(message),
	})
	return err
}
